#pragma once

// Normally set by the build; the fallback keeps the header usable on its own.
#ifndef MODWST_VERSION
#define MODWST_VERSION "0.1.0"
#endif
