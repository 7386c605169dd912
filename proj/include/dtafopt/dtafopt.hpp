#pragma once

#include "dtafopt/ambiguity.hpp"
#include "dtafopt/conic/hermitian.hpp"
#include "dtafopt/conic/problem.hpp"
#include "dtafopt/conic/solver.hpp"
#include "dtafopt/detect.hpp"
#include "dtafopt/errors.hpp"
#include "dtafopt/io.hpp"
#include "dtafopt/linalg.hpp"
#include "dtafopt/rational.hpp"
#include "dtafopt/srocr.hpp"
#include "dtafopt/trigpoly.hpp"
