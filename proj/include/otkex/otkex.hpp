#pragma once

// Umbrella header.

#include "otkex/bignat.hpp"
#include "otkex/bytes.hpp"
#include "otkex/channel.hpp"
#include "otkex/cipher.hpp"
#include "otkex/coinflip.hpp"
#include "otkex/errors.hpp"
#include "otkex/frame.hpp"
#include "otkex/mutual.hpp"
#include "otkex/numtheory.hpp"
#include "otkex/ot12.hpp"
#include "otkex/params.hpp"
#include "otkex/rng.hpp"
#include "otkex/session.hpp"
#include "otkex/sha256.hpp"
#include "otkex/simulate.hpp"
#include "otkex/socket_channel.hpp"
#include "otkex/transcript.hpp"
#include "otkex/zkp.hpp"
