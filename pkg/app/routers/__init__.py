# routers package
