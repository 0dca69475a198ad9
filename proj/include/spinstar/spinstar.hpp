#pragma once

// Exact spin-star pure-dephasing simulation: states, entropic measures and
// the information-backflow bound.

#include "backflow.hpp"
#include "correlations.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "measures.hpp"
#include "model.hpp"
#include "symmetric.hpp"
