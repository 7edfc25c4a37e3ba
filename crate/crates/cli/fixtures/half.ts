# multiples of one half
window 0 0
points 0
tail uniform 0.5
