#include "khora/cover.hpp"
