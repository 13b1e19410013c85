#include "wge/error.hpp"
