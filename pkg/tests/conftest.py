import time

# wall-clock anchor for the whole-suite runtime criterion (checked by the
# alphabetically last test module)
SESSION_T0 = time.monotonic()
