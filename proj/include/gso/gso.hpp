#pragma once

#include <gso/error.hpp>
#include <gso/group_model.hpp>
#include <gso/proj_cyclic.hpp>
#include <gso/proj_dual_newton.hpp>
#include <gso/prox.hpp>
#include <gso/solver.hpp>
#include <gso/path.hpp>
#include <gso/synthetic.hpp>
#include <gso/bench.hpp>
