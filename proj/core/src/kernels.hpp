#pragma once

#include "kcoupler/core.hpp"
#include "kcoupler/phasespace.hpp"

namespace kcoupler::detail {

/// Characteristic-function series for given abar_j(t), eps and chi t.
cplx characteristic_series(cplx abar, double epsilon, double chi_t, cplx zeta,
                           const SeriesControl& ctl);

/// k * x reduced modulo pi in extended precision; k can reach ~1e5 in the
/// phase-space series. The result has the sign of x.
long double reduce_mod_pi(long double x, long long k);

}  // namespace kcoupler::detail
