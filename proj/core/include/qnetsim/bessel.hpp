#pragma once

namespace qnetsim {

// Bessel function of the first kind J_k(x), |x| modest (phase-modulator
// sideband range). Power series for small arguments, Miller downward
// recurrence with the J_0 + 2*sum J_2m = 1 normalization otherwise.
// Accuracy target 1e-10 on k in [-40, 40], x in [0, 10].
double bessel_j(int order, double x);

}  // namespace qnetsim
