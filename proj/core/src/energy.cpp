#include "sixsim/energy.hpp"

namespace sixsim {

double charge_of(SlotOutcome o, const ChargeConfig& c) {
  switch (o) {
    case SlotOutcome::Sleep: return c.sleep_uc;
    case SlotOutcome::RxIdle: return c.rx_idle_uc;
    case SlotOutcome::TxDataRxAck: return c.tx_data_rx_ack_uc;
    case SlotOutcome::TxDataOnly: return c.tx_data_only_uc;
    case SlotOutcome::RxDataTxAck: return c.rx_data_tx_ack_uc;
    case SlotOutcome::RxDataOnly: return c.rx_data_only_uc;
    case SlotOutcome::kCount: break;
  }
  return 0.0;
}

double EnergyMeter::charge_c(const ChargeConfig& c) const {
  double uc = 0.0;
  for (int i = 0; i < kSlotOutcomes; ++i)
    uc += static_cast<double>(slots[i]) * charge_of(static_cast<SlotOutcome>(i), c);
  return uc * 1e-6;
}

Lifetime lifetime_years(double charge_c, double sim_seconds,
                        double battery_c) {
  constexpr double kSecondsPerYear = 365.0 * 24.0 * 3600.0;
  Lifetime lt;
  if (charge_c <= 0.0) {
    lt.infinite = true;
    return lt;
  }
  double current = charge_c / sim_seconds;  // average amps
  lt.years = battery_c / current / kSecondsPerYear;
  return lt;
}

}  // namespace sixsim
