# the integers from 0 up
window 0 0
points 0
tail uniform 1
