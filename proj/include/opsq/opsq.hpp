#pragma once

#include "opsq/errors.hpp"
#include "opsq/linalg.hpp"
#include "opsq/integrator.hpp"
#include "opsq/one_particle.hpp"
#include "opsq/reduction.hpp"
#include "opsq/information.hpp"
#include "opsq/model.hpp"
#include "opsq/dynamics.hpp"
#include "opsq/moments.hpp"
#include "opsq/oracle.hpp"
#include "opsq/random.hpp"
