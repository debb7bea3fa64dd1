// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qmetro/bounds.hpp"
#include "qmetro/channel.hpp"
#include "qmetro/fisher.hpp"
#include "qmetro/frequency.hpp"
#include "qmetro/matkit.hpp"
#include "qmetro/oracle.hpp"
#include "qmetro/sdp.hpp"
