#include "khora/checks.hpp"
