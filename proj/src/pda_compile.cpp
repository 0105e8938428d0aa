#include "pinball/pda.hpp"
