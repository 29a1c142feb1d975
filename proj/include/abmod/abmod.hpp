#pragma once

/// Umbrella header: exact arithmetic for regular modules over the formal
/// power series ring in b carrying an operator a with ab - ba = b^2.

#include "errors.hpp"
#include "scalars.hpp"
#include "roots.hpp"
#include "series.hpp"
#include "linalg.hpp"
#include "series_matrix.hpp"
#include "lattice.hpp"
#include "module.hpp"
#include "invariants.hpp"
#include "structure.hpp"
#include "jets.hpp"
#include "io.hpp"
