#pragma once

namespace khora {}
