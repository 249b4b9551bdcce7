// Schmidt coefficients of a single delocalized excitation across every cut,
// next to the SVD of the embedded qubit state.

#include <cstdio>

#include "opsq/opsq.hpp"

using namespace opsq;

int main() {
  ComplexVector amp(4);
  amp << 0.5, 0.5, Complex(0.0, 0.5), -0.5;  // |0>, |1>, |2>, |3>
  const auto phi = OneParticlePureState::from_amplitudes(amp);
  const auto embedded = oracle::embed_pure(phi);

  for (const IndexSet part : {IndexSet{1}, IndexSet{2}, IndexSet{1, 2}, IndexSet{1, 3}}) {
    const auto closed = schmidt_coefficients(phi, part);
    const auto svd = oracle::schmidt(embedded, oracle::qubit_dims(3), part);
    std::printf("I = {");
    for (int l : part.members()) std::printf(" %d", l);
    std::printf(" }  entangled=%d  closed:", pure_state_entangled(phi, part));
    for (double x : closed) std::printf(" %.12f", x);
    std::printf("  svd:");
    for (double x : svd) std::printf(" %.12f", x);
    std::printf("\n");
  }
}
