#pragma once

// Umbrella header.

#include "stieltjesk/rational.hpp"
#include "stieltjesk/poly.hpp"
#include "stieltjesk/ratfn.hpp"
#include "stieltjesk/piecewise.hpp"
#include "stieltjesk/logrational.hpp"
#include "stieltjesk/hyperbolic_fn.hpp"
#include "stieltjesk/jet.hpp"
#include "stieltjesk/quadrature.hpp"
#include "stieltjesk/kernels.hpp"
#include "stieltjesk/funcmodel.hpp"
#include "stieltjesk/expr_parse.hpp"
#include "stieltjesk/stieltjes.hpp"
#include "stieltjesk/sign.hpp"
#include "stieltjesk/parallel.hpp"
#include "stieltjesk/membership.hpp"
#include "stieltjesk/hyperbolic.hpp"
#include "stieltjesk/showcase.hpp"
#include "stieltjesk/verify.hpp"
#include "stieltjesk/json_io.hpp"
