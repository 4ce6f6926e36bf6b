#pragma once

#include "checked_int.hpp"
#include "rational.hpp"
#include "moebius.hpp"
#include "quadform.hpp"
#include "pairclass.hpp"
#include "quadrature.hpp"
#include "kernels.hpp"
#include "transforms.hpp"
#include "harness.hpp"
