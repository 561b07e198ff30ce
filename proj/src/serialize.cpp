#include "endring/serialize.hpp"

#include <sstream>

namespace endring {

namespace {

json str(const Int& x) { return to_string(x); }

json rat_row(const RatVec& v) {
  json row = json::array();
  for (const Rat& x : v) row.push_back(to_string(x));
  return row;
}

[[noreturn]] void bad_input(const std::string& what) { fail("BadInput", what); }

const json& field_of(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad_input(std::string("missing field '") + key + "'");
  return j.at(key);
}

Int int_from_json(const json& j) {
  Int v;
  if (j.is_string()) {
    if (v.set_str(j.get<std::string>(), 10) != 0) bad_input("not an integer: " + j.dump());
  } else if (j.is_number_integer()) {
    v = Int(j.dump());
  } else {
    bad_input("not an integer: " + j.dump());
  }
  return v;
}

Poly<Fp2> poly_from_json(const json& j, const Field* F) {
  if (!j.is_array()) bad_input("polynomial must be an array");
  std::vector<Fp2> c;
  for (const auto& x : j) c.push_back(fp2_from_json(x, F));
  return Poly<Fp2>(F, std::move(c));
}

StepKind kind_from_name(const std::string& s) {
  for (StepKind k : {StepKind::Velu, StepKind::Frobenius, StepKind::Isomorphism, StepKind::Scalar})
    if (kind_name(k) == s) return k;
  bad_input("unknown step kind '" + s + "'");
}

}  // namespace

json to_json(const Fp2& x) { return json::array({std::to_string(x.a), std::to_string(x.b)}); }

json to_json(const Curve& E) { return json{{"a", to_json(E.a)}, {"b", to_json(E.b)}}; }

json to_json(const Poly<Fp2>& f) {
  json out = json::array();
  for (const auto& c : f.c) out.push_back(to_json(c));
  return out;
}

json to_json(const IsogenyStep& s) {
  json out{{"kind", kind_name(s.kind)}, {"degree", str(s.degree)}, {"domain", to_json(s.dom)},
           {"codomain", to_json(s.cod)}};
  switch (s.kind) {
    case StepKind::Velu:
      out["kernel"] = to_json(s.kernel);
      out["xnum"] = to_json(s.xnum);
      out["ynum"] = to_json(s.ynum);
      out["ex"] = s.ex;
      out["ey"] = s.ey;
      break;
    case StepKind::Isomorphism:
      out["u"] = to_json(s.u);
      break;
    case StepKind::Scalar:
      out["n"] = str(s.n);
      break;
    case StepKind::Frobenius:
      break;
  }
  return out;
}

json to_json(const IsogenyChain& c) {
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(to_json(s));
  return json{{"base", to_json(c.domain())}, {"degree", str(c.degree())}, {"steps", steps}};
}

json to_json(const WalkRecord& w) {
  json js = json::array();
  for (const auto& j : w.j_sequence) js.push_back(to_json(j));
  return json{{"ell", w.ell}, {"j_sequence", js}, {"choices", w.choices}};
}

json to_json(const GramMatrix& G) {
  json out = json::array();
  for (const auto& row : G.g) {
    json r = json::array();
    for (const auto& x : row) r.push_back(str(x));
    out.push_back(r);
  }
  return out;
}

json to_json(const QuatOrder& O) {
  json basis = json::array();
  for (const auto& row : O.basis) basis.push_back(rat_row(row));
  return json{{"a", to_string(O.alg->a)}, {"b", to_string(O.alg->b)}, {"basis", basis}};
}

json to_json(const InseparableReflection& r, bool selfcheck, bool trace_walks) {
  json jw = json::array();
  for (const auto& j : r.walk.j_sequence) jw.push_back(to_json(j));
  json out{{"ell", r.ell},
           {"d", r.d},
           {"j_walk", jw},
           {"k", r.k},
           {"degree", str(r.degree())},
           {"epsilon", r.epsilon},
           {"walks_tried", r.walks_tried},
           {"chain", to_json(r.chain)},
           {"selfcheck", selfcheck}};
  if (trace_walks) out["walk"] = to_json(r.walk);
  return out;
}

namespace {

json reflection_summary(const InseparableReflection& r, bool trace_walks) {
  json out{{"ell", r.ell}, {"d", r.d}, {"k", r.k}, {"degree", str(r.degree())}, {"walks_tried", r.walks_tried}};
  if (trace_walks) out["walk"] = to_json(r.walk);
  return out;
}

}  // namespace

json to_json(const BassResult& b, bool trace_walks) {
  return json{{"p", std::to_string(b.a1.base.field()->p())},
              {"curve", to_json(b.a1.base)},
              {"reflections", {reflection_summary(b.a1, trace_walks), reflection_summary(b.a2, trace_walks)}},
              {"trace_rho", str(b.trace_rho)},
              {"degree_rho", str(b.rho.degree())},
              {"disc_rho", str(b.disc_rho)},
              {"gram", to_json(b.gram)},
              {"order", to_json(b.order)},
              {"discrd", str(discrd(b.order))}};
}

json to_json(const EndRingResult& r, bool trace_walks) {
  json refl = json::array(), emb = json::array(), trace = json::array();
  for (const auto& g : r.reflections) refl.push_back(reflection_summary(g, trace_walks));
  for (const auto& row : r.embedding) emb.push_back(rat_row(row));
  for (const auto& d : r.provenance.gcd_trace) trace.push_back(str(d));
  json out{{"p", str(r.p)},
           {"curve", to_json(r.curve)},
           {"j", to_json(j_invariant(r.curve))},
           {"discrd", str(discrd(r.order))},
           {"order", to_json(r.order)},
           {"zp_order", to_json(r.zp_order)},
           {"gram", to_json(r.gram)},
           {"embedding", emb},
           {"reflections", refl},
           {"provenance",
            {{"method", r.provenance.method},
             {"reflections_used", r.provenance.reflections_used},
             {"gcd_trace", trace},
             {"notes", r.provenance.notes}}}};
  if (r.provenance.method == "enumerate") {
    out["overorders_found"] = r.overorders_found;
    out["overorder_bound"] = str(r.overorder_bound);
    out["large_q_steps"] = r.stats.large_q_steps;
  }
  return out;
}

Fp2 fp2_from_json(const json& j, const Field* F) {
  if (!j.is_array() || j.size() != 2) bad_input("field element must be an array of two decimal strings");
  Int a = int_from_json(j[0]), b = int_from_json(j[1]);
  Int p(static_cast<unsigned long>(F->p()));
  if (a < 0 || a >= p || b < 0 || b >= p) bad_input("field element coefficient out of range");
  return F->make(a.get_ui(), b.get_ui());
}

Curve curve_from_json(const json& j, const Field* F) {
  Curve E{fp2_from_json(field_of(j, "a"), F), fp2_from_json(field_of(j, "b"), F)};
  if (!is_nonsingular(E)) bad_input("singular curve");
  return E;
}

IsogenyChain chain_from_json(const json& j, const Field* F) {
  IsogenyChain c;
  c.base = curve_from_json(field_of(j, "base"), F);
  const json& steps = field_of(j, "steps");
  if (!steps.is_array()) bad_input("steps must be an array");
  Rng rng(0);
  for (const auto& js : steps) {
    StepKind kind = kind_from_name(field_of(js, "kind").get<std::string>());
    Curve dom = curve_from_json(field_of(js, "domain"), F);
    Curve cod = curve_from_json(field_of(js, "codomain"), F);
    IsogenyStep s;
    switch (kind) {
      case StepKind::Frobenius:
        s = frobenius_step(dom);
        break;
      case StepKind::Isomorphism:
        s = isomorphism_step(dom, fp2_from_json(field_of(js, "u"), F));
        break;
      case StepKind::Scalar:
        s = scalar_step(dom, int_from_json(field_of(js, "n")));
        break;
      case StepKind::Velu: {
        Int deg = int_from_json(field_of(js, "degree"));
        if (deg != 2 && deg != 3 && deg != 5) fail("BadKernel", "Velu steps have degree 2, 3 or 5");
        IsogenyStep v = velu_isogeny(dom, poly_from_json(field_of(js, "kernel"), F), static_cast<int>(deg.get_si()));
        Poly<Fp2> xnum = poly_from_json(field_of(js, "xnum"), F), ynum = poly_from_json(field_of(js, "ynum"), F);
        bool found = false;
        for (const Fp2& u : isomorphisms(v.cod, cod, rng)) {
          IsogenyStep cand = compose_scaling(v, u);
          if (cand.xnum == xnum && cand.ynum == ynum) {
            s = cand;
            found = true;
            break;
          }
        }
        if (!found) fail("BadChain", "Velu step maps disagree with its kernel");
        break;
      }
    }
    if (s.cod != cod) fail("BadChain", "declared codomain does not match the step");
    if (!c.steps.empty() && c.steps.back().cod != s.dom) fail("BadChain", "consecutive steps do not compose");
    if (c.steps.empty() && s.dom != c.base) fail("BadChain", "first step does not start at the base curve");
    c.append(s);
  }
  return c;
}

std::string trials_csv(const ExperimentResult& r) {
  std::ostringstream os;
  if (!r.box.empty()) os << "# box: " << r.box << "\n";
  os << "bits,prime,trial,seed,gcd_coprime,generated,reflections_used,disc_rho_1,disc_rho_2\n";
  for (const auto& t : r.trials)
    os << t.bits << "," << t.prime << "," << t.trial << "," << t.seed << "," << t.gcd_ok << "," << t.generated << ","
       << t.reflections_used << "," << t.disc1 << "," << t.disc2 << "\n";
  return os.str();
}

std::string aggregate_csv(const ExperimentResult& r) {
  std::ostringstream os;
  os << "bits,trials,freq_gcd,freq_generate\n";
  for (const auto& row : r.rows)
    os << row.bits << "," << row.trials << "," << row.gcd_count << "/" << row.trials << "," << row.generate_count << "/"
       << row.trials << "\n";
  return os.str();
}

}  // namespace endring
