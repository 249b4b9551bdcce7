// A particle hops between two sites while site 2 leaks into the vacuum.
// Prints rho00, the site populations and the mutual information between
// the sites.

#include <cstdio>

#include "opsq/opsq.hpp"

using namespace opsq;

int main() {
  ComplexMatrix h(2, 2);
  h << 0.0, 0.4, 0.4, 0.0;
  ComplexVector f(2);
  f << 0.0, 1.0;
  const auto model = GKSLModel::constant(h, {f});

  ComplexMatrix r = ComplexMatrix::Zero(2, 2);
  r(0, 0) = 1.0;
  const auto s0 = OneParticleState::strict(r);

  std::printf("%6s %10s %10s %10s %10s\n", "t", "rho00", "p1", "p2", "I");
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.5 * k;
    const auto s = evolve_state(s0, model, t);
    const auto mi = mutual_information(s, IndexSet{1}, IndexSet{2});
    std::printf("%6.2f %10.6f %10.6f %10.6f %10.6f\n", t, s.rho00(), s.r()(0, 0).real(),
                s.r()(1, 1).real(), mi.total);
  }
}
