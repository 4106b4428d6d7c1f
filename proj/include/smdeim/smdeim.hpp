#pragma once

#include "smdeim/deim.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/instrumentation.hpp"
#include "smdeim/jacobian_approx.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/models/burgers.hpp"
#include "smdeim/models/full_model.hpp"
#include "smdeim/models/quadratic_form.hpp"
#include "smdeim/models/swe.hpp"
#include "smdeim/persistence.hpp"
#include "smdeim/pod.hpp"
#include "smdeim/rom.hpp"
#include "smdeim/snapshots.hpp"
