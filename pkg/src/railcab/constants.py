"""Physical and behavioural constants for the simulator and driver policy.

Everything that shapes a generated trace lives here, so a dataset is fully
reproducible from (route, seed, dt) and tests can reference the same numbers
the simulator uses.
"""

DT_S = 0.1                  # simulation step (s)
NOTCH_MAX = 4               # power/brake lever positions 0..4
A_MAX_MPS2 = 1.0            # acceleration at full power notch (m/s^2)
B_MAX_MPS2 = 1.2            # deceleration at full service brake (m/s^2)

# Mass-normalised running resistance: c0 + c1*v + c2*v^2, in m/s^2.
RESIST_C0 = 0.05
RESIST_C1 = 0.004
RESIST_C2 = 0.0004

# Operational band around the current speed target. The detector reports
# above/below outside BAND_FRAC, but only reports "in band" once speed has
# recovered to within RECOVERY_FRAC of the target; the gap keeps correction
# states from collapsing after a single step.
BAND_FRAC = 0.04
RECOVERY_FRAC = 0.02

# Station stops: a stop is latched once the remaining distance falls under
# the braking curve at STATION_TRIGGER_DECEL; the stopping plan then brakes
# above the curve by BRAKE_MARGIN, scaled per stop by a conservatism draw,
# so it never needs emergency rates.
STATION_TRIGGER_DECEL = 0.6 * B_MAX_MPS2
BRAKE_MARGIN = 1.15
STOP_CONSERVATISM = (0.95, 1.30)

SPEED_GAIN = 1.3            # power notches per m/s of underspeed
BRAKE_GAIN = 0.4            # brake notches per m/s of overspeed

NOISE_PROB = 0.05           # per-step chance of a +-1 notch perturbation
ACK_DELAY_PROB = 0.01       # chance the AWS acknowledgment slips one step
ROA_NOISE_SD = 0.055        # accelerometer noise on the RoA channel (m/s^2)
SIGNAL_COAST_M = 4.0        # controls eased to (0,0) this far before a signal
DWELL_JITTER_S = 40.0       # per-stop random extension of the booked dwell

MAX_STEPS_DEFAULT = 200_000

# Variance floor applied to per-class Gaussians after standardisation.
VAR_FLOOR = 1e-6
