#include "endring/ssgraph.hpp"

namespace endring {

namespace {

struct RawTerm {
  int ell, i, j;
  const char* coef;
};

// Terms X^i Y^j with i <= j, plus X^(ell+1) stored as (ell+1, 0).
const RawTerm kTerms[] = {
    {2, 0, 0, "-157464000000000"},
    {2, 0, 1, "8748000000"},
    {2, 0, 2, "-162000"},
    {2, 1, 1, "40773375"},
    {2, 1, 2, "1488"},
    {2, 2, 2, "-1"},
    {2, 3, 0, "1"},
    {3, 0, 1, "1855425871872000000000"},
    {3, 0, 2, "452984832000000"},
    {3, 0, 3, "36864000"},
    {3, 1, 1, "-770845966336000000"},
    {3, 1, 2, "8900222976000"},
    {3, 1, 3, "-1069956"},
    {3, 2, 2, "2587918086"},
    {3, 2, 3, "2232"},
    {3, 3, 3, "-1"},
    {3, 4, 0, "1"},
    {5, 0, 0, "141359947154721358697753474691071362751004672000"},
    {5, 0, 1, "53274330803424425450420160273356509151232000"},
    {5, 0, 2, "6692500042627997708487149415015068467200"},
    {5, 0, 3, "280244777828439527804321565297868800"},
    {5, 0, 4, "1284733132841424456253440"},
    {5, 0, 5, "1963211489280"},
    {5, 1, 1, "-264073457076620596259715790247978782949376"},
    {5, 1, 2, "36554736583949629295706472332656640000"},
    {5, 1, 3, "-192457934618928299655108231168000"},
    {5, 1, 4, "128541798906828816384000"},
    {5, 1, 5, "-246683410950"},
    {5, 2, 2, "5110941777552418083110765199360000"},
    {5, 2, 3, "26898488858380731577417728000"},
    {5, 2, 4, "383083609779811215375"},
    {5, 2, 5, "2028551200"},
    {5, 3, 3, "-441206965512914835246100"},
    {5, 3, 4, "107878928185336800"},
    {5, 3, 5, "-4550940"},
    {5, 4, 4, "1665999364600"},
    {5, 4, 5, "3720"},
    {5, 5, 5, "-1"},
    {5, 6, 0, "1"},
};

ModularPolynomial build(int ell) {
  ModularPolynomial m{ell, {}};
  for (const auto& t : kTerms)
    if (t.ell == ell) m.terms.emplace_back(t.i, t.j, Int(t.coef));
  return m;
}

}  // namespace

const ModularPolynomial& modular_polynomial(int ell) {
  static const ModularPolynomial p2 = build(2), p3 = build(3), p5 = build(5);
  switch (ell) {
    case 2:
      return p2;
    case 3:
      return p3;
    case 5:
      return p5;
  }
  throw std::invalid_argument("modular polynomial only for ell in {2, 3, 5}");
}

}  // namespace endring
