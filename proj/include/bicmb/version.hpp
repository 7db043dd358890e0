#pragma once

#define BICMB_VERSION "0.1.0"
