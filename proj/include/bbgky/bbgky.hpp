#pragma once

// Core library. The config/output harness lives under bbgky/harness/ and
// additionally needs OpenSSL.

#include "bbgky/cumulants.hpp"
#include "bbgky/dynamics.hpp"
#include "bbgky/error.hpp"
#include "bbgky/hartree.hpp"
#include "bbgky/hierarchies.hpp"
#include "bbgky/kinetic.hpp"
#include "bbgky/meanfield.hpp"
#include "bbgky/model.hpp"
#include "bbgky/operator_core.hpp"
#include "bbgky/pairwise_sum.hpp"
#include "bbgky/parallel.hpp"
#include "bbgky/partitions.hpp"
#include "bbgky/quadrature.hpp"
#include "bbgky/random.hpp"
#include "bbgky/rk4.hpp"
