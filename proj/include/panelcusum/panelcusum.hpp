#ifndef PANELCUSUM_PANELCUSUM_HPP_
#define PANELCUSUM_PANELCUSUM_HPP_

#include "panelcusum/core.hpp"
#include "panelcusum/cusum.hpp"
#include "panelcusum/distribution.hpp"
#include "panelcusum/errors.hpp"
#include "panelcusum/longrun.hpp"
#include "panelcusum/segmentation.hpp"
#include "panelcusum/simulate.hpp"

#endif  // PANELCUSUM_PANELCUSUM_HPP_
