#pragma once

#define PHK_VERSION "1.0.0"
