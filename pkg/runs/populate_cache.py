"""Pre-populate runs/acceptance by invoking the exact fixture commands.

Imports run_cli from the test module so cache keys match byte for byte.
Order: cheap runs first for early sanity, then the long Monte-Carlo legs.
"""

import sys
import time

sys.path.insert(0, "/root/pkg/tests")
import test_acceptance as ta  # noqa: E402


def go(args, tag, env_extra=None):
    t0 = time.time()
    path = ta.run_cli(args, tag, env_extra=env_extra)
    dt = time.time() - t0
    with open(path) as f:
        last = f.readlines()[-1].strip()
    print(f"[{dt:8.1f}s] {tag}: {last}", flush=True)


# criterion 9, no-stop op-count bars (256 frames each)
for M, snr in ((32, 3.65), (8, 3.84)):
    go([
        "simulate", "--code", "3,7", "--decoder", "aut-bp",
        "--ensemble", str(M), "--perm-group", "ga",
        "--max-iters", "200", "--stopping", "off",
        "--snr-start", str(snr), "--snr-stop", str(snr),
        "--snr-step", "0.1", "--min-errors", "1000000000",
        "--max-frames", "256", "--seed", "6", "--threads", "1",
    ], f"c09-nostop{M}")

# criterion 5, the three cheap decoders then MBBP
base5 = ["simulate", "--code", "3,7",
         "--snr-start", "3.0", "--snr-stop", "3.0", "--snr-step", "0.1",
         "--min-errors", "1000000000", "--max-frames", "100000",
         "--seed", "4", "--threads", "1"]
go(base5 + ["--decoder", "ffg-bp", "--max-iters", "200", "--stopping", "on"],
   "c05-ffg")
go(base5 + ["--decoder", "tanner-bp", "--max-iters", "30"], "c05-naive")
go(base5 + ["--decoder", "aut-bp", "--ensemble", "8", "--perm-group", "ga",
            "--max-iters", "200", "--stopping", "on"], "c05-aut8")

# criterion 1 anchor (also feeds criteria 2 and 9)
go(ta.C1_ARGS + ["--threads", "1"], "c01-anchor32")

# criterion 11: same anchor command at a different thread count
go(ta.C1_ARGS + ["--threads", "4"], "c11-threads4",
   env_extra={"NUMBA_NUM_THREADS": "4"})

# criterion 4: GA vs PI at two SNRs and two ensemble sizes
for M in (8, 32):
    for group in ("ga", "pi"):
        for snr in (3.2, 3.5):
            go(ta._aut_args(M, group, snr, ta.C4_FRAMES[(M, snr)], 3),
               f"c04-m{M}-{group}-{snr}")

# the long leg last
go(base5 + ["--decoder", "mbbp", "--ensemble", "60", "--max-iters", "6"],
   "c05-mbbp")

print("CACHE POPULATION DONE", flush=True)
