"""
Outage geometry in the fading plane
===================================

A fading realization is a point (a1, a2). Information outage claims the
region where average mutual information falls below the rate; density
evolution outage (DEO) claims the larger region where the ensemble's
decoder fails even asymptotically. Both regions are star-shaped, so each
is summarized by its boundary radius per direction. The DE budget here is
tiny to keep the demo quick; boundary radii wobble by a few percent.
"""
import numpy as np

from turbofade import (
    DeConfig,
    deo_radius_on_ray,
    information_outage_radius,
    validate_profile,
)

profile = validate_profile({2: 0.9, 12: 0.1})
ebn0_db = 8.0
demo_config = DeConfig(window=2000, guard=100, samples_per_iteration=60_000,
                       max_iterations=60)

print(f"boundary radii at {ebn0_db} dB (information vs DEO)")
for angle in (15.0, 30.0, 45.0, 60.0, 75.0):
    info = information_outage_radius(angle, ebn0_db)
    # opening the bracket at the information radius keeps the converse
    # ordering visible even at this precision
    deo = deo_radius_on_ray(profile, angle, ebn0_db, demo_config, seed=2,
                            seed_radius=info, precision=0.2)
    print(f"  {angle:4.0f} deg   info {info:.3f}   deo {deo:.3f}")

# the axes are the one place the two criteria part ways: the information
# region never closes (a dead block pins capacity below the rate at every
# finite gain), while the DEO verdict is a bit-error target that one
# sufficiently strong block can meet on its own through the pin slots
axis_info = information_outage_radius(0.0, ebn0_db)
axis_deo = deo_radius_on_ray(profile, 0.0, ebn0_db, demo_config, seed=2,
                             precision=0.2, cap=4.0)
info_text = "unbounded" if axis_info is None else f"{axis_info:.3f}"
deo_text = "unbounded" if axis_deo is None else f"{axis_deo:.3f}"
print(f"  axis       info {info_text}   deo {deo_text}")
