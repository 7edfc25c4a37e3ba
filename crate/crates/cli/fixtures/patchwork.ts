# intervals and isolated points, then the reals
window 0 6
interval 0 1
points 1.5 2
interval 3 4
points 4.25 5
interval 5.5 6
tail continuous
