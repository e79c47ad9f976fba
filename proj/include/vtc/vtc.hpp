// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vtc/bias.hpp"
#include "vtc/config.hpp"
#include "vtc/dump.hpp"
#include "vtc/dump_io.hpp"
#include "vtc/error.hpp"
#include "vtc/gapool.hpp"
#include "vtc/segattn.hpp"
#include "vtc/sequence_io.hpp"
#include "vtc/synthetic.hpp"
#include "vtc/vstail.hpp"
