#pragma once

#include "sorkin/analytic.hpp"
#include "sorkin/fraunhofer.hpp"
#include "sorkin/fresnel.hpp"
#include "sorkin/geometry.hpp"
#include "sorkin/kappa.hpp"
#include "sorkin/quadrature.hpp"
#include "sorkin/version.hpp"
