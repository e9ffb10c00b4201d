#pragma once

#include "tspdim/core_types.hpp"
#include "tspdim/pathlen.hpp"
#include "tspdim/spacefill.hpp"
#include "tspdim/geometry.hpp"
#include "tspdim/manifolds.hpp"
#include "tspdim/estimator.hpp"
#include "tspdim/bounds.hpp"
#include "tspdim/lecam.hpp"
#include "tspdim/io.hpp"
#include "tspdim/harness.hpp"
