#pragma once

// Umbrella header.

#include "contact_spectral/capacities.hpp"
#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/fixtures.hpp"
#include "contact_spectral/linalg.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/profile_flows.hpp"
#include "contact_spectral/rabinowitz.hpp"
#include "contact_spectral/report.hpp"
#include "contact_spectral/translated_points.hpp"
#include "contact_spectral/util.hpp"
#include "contact_spectral/verify.hpp"
