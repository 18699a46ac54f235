#pragma once

#include "jumpstab/consensus.hpp"
#include "jumpstab/control.hpp"
#include "jumpstab/coupling.hpp"
#include "jumpstab/ensemble.hpp"
#include "jumpstab/error.hpp"
#include "jumpstab/fastslow.hpp"
#include "jumpstab/generator.hpp"
#include "jumpstab/integrator.hpp"
#include "jumpstab/levy.hpp"
#include "jumpstab/lipschitz.hpp"
#include "jumpstab/polar.hpp"
#include "jumpstab/stability.hpp"
#include "jumpstab/stats.hpp"
#include "jumpstab/system.hpp"
#include "jumpstab/version.hpp"
