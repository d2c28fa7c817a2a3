#ifndef PASIM_PASIM_HPP
#define PASIM_PASIM_HPP

#include "pasim/barrier.hpp"
#include "pasim/baselines.hpp"
#include "pasim/channel.hpp"
#include "pasim/config.hpp"
#include "pasim/experiment.hpp"
#include "pasim/outage.hpp"
#include "pasim/plot_script.hpp"
#include "pasim/rng.hpp"
#include "pasim/scenario.hpp"
#include "pasim/sca.hpp"
#include "pasim/validation.hpp"

#endif // PASIM_PASIM_HPP
