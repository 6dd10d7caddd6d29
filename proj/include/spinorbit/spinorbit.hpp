#pragma once

#include "spinorbit/dynamics.hpp"
#include "spinorbit/errors.hpp"
#include "spinorbit/frequency.hpp"
#include "spinorbit/kepler.hpp"
#include "spinorbit/normal_form.hpp"
#include "spinorbit/parallel.hpp"
#include "spinorbit/parametrization.hpp"
#include "spinorbit/trig_series.hpp"
