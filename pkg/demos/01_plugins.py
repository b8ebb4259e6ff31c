"""
Extending a function without touching it
=========================================

Any function can be made extendable with ``expose_to_plugins``. Handlers
attached "before", "after" or "instead" then change its behaviour from the
outside.
"""

from simenv import ChangedArgs, ChangedResult, attach_handler, expose_to_plugins, remove_handler


def my_func(input):
    """Pretend this lives in a black-box domain model."""
    return input + 1


print(my_func(2))  # 3

# Exposing does not change behaviour by itself
my_func = expose_to_plugins(my_func, name="demo.my_func")
print(my_func(2))  # 3


# A "before" handler sees the arguments
def before_func(input):
    print(f"got {input}")


attach_handler(before_func, my_func, "before")
print(my_func(2))  # got 2, then 3

# Handlers change the input by returning ChangedArgs ...
remove_handler(my_func, "before")


def manipulate(input):
    return ChangedArgs(input * 2)


attach_handler(manipulate, my_func, "before")
print(my_func(2))  # 5

# ... or the output with ChangedResult. After handlers also get the result.
attach_handler(lambda input, result: ChangedResult(result * 100), my_func, "after")
print(my_func(2))  # 500

# "instead" replaces the body altogether; the arguments still pass through
# the before handlers first
attach_handler(lambda input: -input, my_func, "instead")
print(my_func(2))  # (-4) * 100 = -400
