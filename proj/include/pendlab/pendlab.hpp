#pragma once

#include "pendlab/errors.hpp"
#include "pendlab/chain.hpp"
#include "pendlab/dynamics.hpp"
#include "pendlab/linear.hpp"
#include "pendlab/integrator.hpp"
#include "pendlab/period_lab.hpp"
#include "pendlab/campaign.hpp"
