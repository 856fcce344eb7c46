#pragma once

#include "ginprod/errors.hpp"
#include "ginprod/quadrature.hpp"
#include "ginprod/gamma.hpp"
#include "ginprod/rational.hpp"
#include "ginprod/params.hpp"
#include "ginprod/specfun.hpp"
#include "ginprod/biorth.hpp"
#include "ginprod/dual.hpp"
#include "ginprod/kernel.hpp"
#include "ginprod/sampler.hpp"
