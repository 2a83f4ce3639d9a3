#pragma once

#define TOR_VERSION_STRING "0.1.0"
