#pragma once

#include "padicdm/errors.hpp"
#include "padicdm/rational.hpp"
#include "padicdm/field.hpp"
#include "padicdm/scalar.hpp"
#include "padicdm/hensel.hpp"
#include "padicdm/series.hpp"
#include "padicdm/polygon.hpp"
#include "padicdm/morphism.hpp"
#include "padicdm/matrix.hpp"
#include "padicdm/diffmod.hpp"
#include "padicdm/optimal.hpp"
#include "padicdm/json_io.hpp"
#include "padicdm/job.hpp"
#include "padicdm/worked_examples.hpp"
