#pragma once

#include "treeshift/classify.hpp"
#include "treeshift/error.hpp"
#include "treeshift/kernel_spaces.hpp"
#include "treeshift/numerics.hpp"
#include "treeshift/shift.hpp"
#include "treeshift/tree.hpp"
#include "treeshift/tree_io.hpp"
