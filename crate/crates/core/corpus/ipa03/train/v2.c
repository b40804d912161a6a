int main() {
    int a, b, r;
    scanf("%d%d", &a, &b);
    r = a % b;
    if (r != 0) {
        printf("no\n");
    } else {
        printf("yes\n");
    }
    return 0;
}
