#pragma once

namespace safesde {

// Bessel J of the first kind, order nu >= 0, argument z >= 0.
// Ascending series below z = 0.5 (the closed half-integer forms cancel
// there), closed forms for half-integer orders up to 7/2, library evaluation
// otherwise. Relative accuracy ~1e-12 against the oscillation envelope.
double bessel_j(double nu, double z);

}  // namespace safesde
