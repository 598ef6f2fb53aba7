#pragma once

// Umbrella header: geometry of the space of non-degenerate bilinear
// structures over a discretized base, with the one-parameter metric family
// G^alpha, closed-form geodesics, curvature, submanifold closure checks,
// and the distribution-induced splitting of the manifold of metrics.

#include "bilin/errors.hpp"
#include "bilin/fiber.hpp"
#include "bilin/fields.hpp"
#include "bilin/field_io.hpp"
#include "bilin/metric.hpp"
#include "bilin/geodesics.hpp"
#include "bilin/curvature.hpp"
#include "bilin/submanifolds.hpp"
#include "bilin/splitting.hpp"
#include "bilin/random.hpp"
