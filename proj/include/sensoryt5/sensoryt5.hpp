#pragma once

#include "sensoryt5/attention.hpp"
#include "sensoryt5/autograd.hpp"
#include "sensoryt5/checkpoint.hpp"
#include "sensoryt5/config.hpp"
#include "sensoryt5/dataset.hpp"
#include "sensoryt5/encoder_decoder.hpp"
#include "sensoryt5/error.hpp"
#include "sensoryt5/grad_check.hpp"
#include "sensoryt5/io.hpp"
#include "sensoryt5/lexicon.hpp"
#include "sensoryt5/metrics.hpp"
#include "sensoryt5/model.hpp"
#include "sensoryt5/optim.hpp"
#include "sensoryt5/params.hpp"
#include "sensoryt5/random.hpp"
#include "sensoryt5/regression.hpp"
#include "sensoryt5/sensory_adapter.hpp"
#include "sensoryt5/tensor.hpp"
#include "sensoryt5/train.hpp"
