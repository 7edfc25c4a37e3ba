# 1, 2, 4, 8, ...
window 1 1
points 1
tail geometric 2
