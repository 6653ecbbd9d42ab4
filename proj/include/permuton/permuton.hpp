#pragma once

#include "certify.hpp"
#include "density.hpp"
#include "digit_swap.hpp"
#include "distance.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "fourier_motzkin.hpp"
#include "model_io.hpp"
#include "models.hpp"
#include "pattern.hpp"
#include "permutation.hpp"
#include "rational.hpp"
#include "removal.hpp"
#include "sampling.hpp"
#include "stanley_wilf.hpp"
