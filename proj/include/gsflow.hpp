#pragma once

#include "gsflow/branched.hpp"
#include "gsflow/block.hpp"
#include "gsflow/global.hpp"
#include "gsflow/io.hpp"
#include "gsflow/local.hpp"
#include "gsflow/model.hpp"
