#pragma once

#include "openrabi/analytic.hpp"
#include "openrabi/config.hpp"
#include "openrabi/errors.hpp"
#include "openrabi/evolve.hpp"
#include "openrabi/harness.hpp"
#include "openrabi/hilbert.hpp"
#include "openrabi/integrate.hpp"
#include "openrabi/liouvillian.hpp"
#include "openrabi/moments.hpp"
#include "openrabi/output.hpp"
#include "openrabi/params.hpp"
