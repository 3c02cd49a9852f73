#pragma once

#include "fnls/errors.hpp"
#include "fnls/spectral.hpp"
#include "fnls/dynamics.hpp"
#include "fnls/functionals.hpp"
#include "fnls/random_fields.hpp"
#include "fnls/mollifier.hpp"
#include "fnls/exact.hpp"
#include "fnls/experiments.hpp"
#include "fnls/io.hpp"
