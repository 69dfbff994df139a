#pragma once

#include "mbqcqp/core_types.hpp"
#include "mbqcqp/rng.hpp"
#include "mbqcqp/sdp_problem.hpp"
#include "mbqcqp/sdp_solver.hpp"
#include "mbqcqp/relaxation.hpp"
#include "mbqcqp/bounds.hpp"
#include "mbqcqp/rounding.hpp"
#include "mbqcqp/oracle.hpp"
#include "mbqcqp/instance_io.hpp"
#include "mbqcqp/harness.hpp"
