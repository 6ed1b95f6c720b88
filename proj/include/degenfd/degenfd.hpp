#pragma once

#include "degenfd/error.hpp"
#include "degenfd/grid.hpp"
#include "degenfd/random.hpp"
#include "degenfd/operators.hpp"
#include "degenfd/degeneracy.hpp"
#include "degenfd/scheme.hpp"
#include "degenfd/solver.hpp"
#include "degenfd/problems.hpp"
#include "degenfd/verify.hpp"
