#pragma once

#include "kgml/errors.hpp"
#include "kgml/polynomial.hpp"
#include "kgml/physcore.hpp"
#include "kgml/fuchsian.hpp"
#include "kgml/specialfn.hpp"
#include "kgml/kgmodels.hpp"
#include "kgml/spectra.hpp"
#include "kgml/asymptotics.hpp"
